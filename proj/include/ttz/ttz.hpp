#pragma once

#include "ttz/adi.hpp"
#include "ttz/bounds.hpp"
#include "ttz/formats.hpp"
#include "ttz/linalg.hpp"
#include "ttz/problems.hpp"
#include "ttz/serialize.hpp"
#include "ttz/special.hpp"
#include "ttz/sylvester.hpp"
#include "ttz/tensor.hpp"
