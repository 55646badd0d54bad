#pragma once

#include "core.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "gqs.hpp"
#include "inverse.hpp"
#include "ode.hpp"
#include "parallel.hpp"
#include "propagator.hpp"
#include "quadrature.hpp"
#include "rabi.hpp"
#include "schedules.hpp"
#include "time_function.hpp"
#include "trace.hpp"
#include "zener.hpp"
