#pragma once

#include "polelab/comparison.hpp"
#include "polelab/expr.hpp"
#include "polelab/extrapolate.hpp"
#include "polelab/integrals.hpp"
#include "polelab/jacobi.hpp"
#include "polelab/jet.hpp"
#include "polelab/profile.hpp"
#include "polelab/quadrature.hpp"
#include "polelab/report.hpp"
#include "polelab/theorems.hpp"
#include "polelab/warped.hpp"
