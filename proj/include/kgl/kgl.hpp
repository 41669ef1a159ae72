#pragma once

#include "kgl/augmented.hpp"
#include "kgl/bounds.hpp"
#include "kgl/dataset_io.hpp"
#include "kgl/errors.hpp"
#include "kgl/gl_kernel.hpp"
#include "kgl/hereditary_sim.hpp"
#include "kgl/identification.hpp"
#include "kgl/lifting.hpp"
#include "kgl/model_io.hpp"
#include "kgl/parallel.hpp"
#include "kgl/prediction.hpp"
#include "kgl/random.hpp"
#include "kgl/reports.hpp"
#include "kgl/selection.hpp"
#include "kgl/text.hpp"

namespace kgl {
inline constexpr const char* kVersion = "1.0.0";
}
