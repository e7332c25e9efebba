#pragma once

#include "palmtex/archive.hpp"
#include "palmtex/classify.hpp"
#include "palmtex/dataset.hpp"
#include "palmtex/evaluate.hpp"
#include "palmtex/glcm.hpp"
#include "palmtex/haralick.hpp"
#include "palmtex/image.hpp"
#include "palmtex/image_io.hpp"
#include "palmtex/pipeline.hpp"
#include "palmtex/version.hpp"
