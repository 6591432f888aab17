#ifndef DUALPATH_DUALPATH_HPP
#define DUALPATH_DUALPATH_HPP

#include "error.hpp"
#include "io.hpp"
#include "loss.hpp"
#include "matrix.hpp"
#include "metrics.hpp"
#include "path.hpp"
#include "policies.hpp"
#include "transpose.hpp"

#endif // DUALPATH_DUALPATH_HPP
