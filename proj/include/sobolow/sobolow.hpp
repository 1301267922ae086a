#pragma once

#include "sobolow/core.hpp"
#include "sobolow/distribution.hpp"
#include "sobolow/errors.hpp"
#include "sobolow/estimators.hpp"
#include "sobolow/model.hpp"
#include "sobolow/multiindex.hpp"
#include "sobolow/quadrature.hpp"
#include "sobolow/sample.hpp"
#include "sobolow/special.hpp"
#include "sobolow/spectral.hpp"
#include "sobolow/spline.hpp"
#include "sobolow/testfunctions.hpp"
#include "sobolow/tridiagonal.hpp"
