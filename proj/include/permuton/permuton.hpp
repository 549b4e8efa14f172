#ifndef PERMUTON_PERMUTON_HPP
#define PERMUTON_PERMUTON_HPP

#include "core.hpp"
#include "curves.hpp"
#include "entropy.hpp"
#include "error.hpp"
#include "insertion.hpp"
#include "io.hpp"
#include "optimizer.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "patterns.hpp"
#include "random.hpp"
#include "regions.hpp"
#include "special.hpp"
#include "starmodel.hpp"

namespace permuton {

inline constexpr const char* kVersion = "1.0.0";

}

#endif
