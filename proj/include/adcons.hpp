#pragma once

#include <adcons/admodels.hpp>
#include <adcons/cmcheck.hpp>
#include <adcons/config.hpp>
#include <adcons/consistency.hpp>
#include <adcons/dfinversion.hpp>
#include <adcons/expr.hpp>
#include <adcons/fracops.hpp>
#include <adcons/parse.hpp>
#include <adcons/quadrature.hpp>
#include <adcons/report.hpp>
#include <adcons/specfun.hpp>
