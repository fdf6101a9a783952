#pragma once

#include "slitlab/analysis.hpp"
#include "slitlab/analytic.hpp"
#include "slitlab/ccd_sim.hpp"
#include "slitlab/config.hpp"
#include "slitlab/constants.hpp"
#include "slitlab/errors.hpp"
#include "slitlab/format.hpp"
#include "slitlab/frame_io.hpp"
#include "slitlab/geometry.hpp"
#include "slitlab/parallel.hpp"
#include "slitlab/philox.hpp"
#include "slitlab/probability_curve.hpp"
#include "slitlab/quadrature.hpp"
#include "slitlab/report_io.hpp"
#include "slitlab/sine_integral.hpp"
