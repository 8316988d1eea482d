#pragma once

#include "qwnn/coined_walk.hpp"
#include "qwnn/lackadaisical_walk.hpp"
#include "qwnn/mlp.hpp"
#include "qwnn/oracle.hpp"
#include "qwnn/trainer.hpp"
#include "qwnn/weight_space.hpp"

namespace qwnn {
inline constexpr const char* version = "0.1.0";
}
