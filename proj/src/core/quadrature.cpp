#include "core/quadrature.hpp"

// Header-only templates; this translation unit exists so the build has a
// stable home for future non-template quadrature helpers.
namespace stochham {}
