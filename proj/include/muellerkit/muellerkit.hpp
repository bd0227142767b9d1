#pragma once

#include "muellerkit/augment.hpp"
#include "muellerkit/bindings.hpp"
#include "muellerkit/dataio.hpp"
#include "muellerkit/errors.hpp"
#include "muellerkit/evalkit.hpp"
#include "muellerkit/jacobi.hpp"
#include "muellerkit/luchipman.hpp"
#include "muellerkit/matrix.hpp"
#include "muellerkit/parallel.hpp"
#include "muellerkit/polcore.hpp"
#include "muellerkit/random.hpp"
#include "muellerkit/realizability.hpp"
#include "muellerkit/synth.hpp"

namespace muellerkit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace muellerkit
