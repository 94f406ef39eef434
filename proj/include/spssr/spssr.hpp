#pragma once

// Umbrella header.

#include "spssr/audit.hpp"     // IWYU pragma: export
#include "spssr/core.hpp"      // IWYU pragma: export
#include "spssr/errors.hpp"    // IWYU pragma: export
#include "spssr/field.hpp"     // IWYU pragma: export
#include "spssr/io_json.hpp"   // IWYU pragma: export
#include "spssr/mutants.hpp"   // IWYU pragma: export
#include "spssr/net.hpp"       // IWYU pragma: export
#include "spssr/random.hpp"    // IWYU pragma: export
#include "spssr/rational.hpp"  // IWYU pragma: export
#include "spssr/scheme.hpp"    // IWYU pragma: export
#include "spssr/simulate.hpp"  // IWYU pragma: export
#include "spssr/wire.hpp"      // IWYU pragma: export
