#ifndef LESC_LESC_HPP
#define LESC_LESC_HPP

#include "lesc/bench.hpp"
#include "lesc/dataset.hpp"
#include "lesc/enhance.hpp"
#include "lesc/errors.hpp"
#include "lesc/kernel.hpp"
#include "lesc/lbfgs.hpp"
#include "lesc/lrr.hpp"
#include "lesc/metrics.hpp"
#include "lesc/prox.hpp"
#include "lesc/svd.hpp"
#include "lesc/tensor_ops.hpp"
#include "lesc/tlrr.hpp"
#include "lesc/types.hpp"

#endif // LESC_LESC_HPP
