#pragma once

#include "polyflow/error.hpp"
#include "polyflow/geometry.hpp"
#include "polyflow/quadrature.hpp"
#include "polyflow/flows.hpp"
#include "polyflow/stepper.hpp"
#include "polyflow/eoc.hpp"
#include "polyflow/io.hpp"
#include "polyflow/svg.hpp"
#include "polyflow/config.hpp"
