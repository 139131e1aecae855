#pragma once

#include "spherecbf/config.hpp"
#include "spherecbf/controllers.hpp"
#include "spherecbf/dynamics.hpp"
#include "spherecbf/errors.hpp"
#include "spherecbf/metrics.hpp"
#include "spherecbf/qp.hpp"
#include "spherecbf/safety.hpp"
#include "spherecbf/scenario.hpp"
#include "spherecbf/simulation.hpp"
#include "spherecbf/so3.hpp"
#include "spherecbf/topology.hpp"
#include "spherecbf/trajectory.hpp"
