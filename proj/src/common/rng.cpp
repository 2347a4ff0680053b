#include "common/rng.hpp"

// Header-only; this file anchors the translation unit for the target.
