#include "tcorr/sequences.hpp"

// Header-only for now; the translation unit anchors the target.
namespace tcorr {}
