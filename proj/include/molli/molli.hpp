#pragma once

#include "classify.hpp"
#include "expr.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "mollify.hpp"
#include "norms.hpp"
#include "radial.hpp"
#include "version.hpp"
#include "weights.hpp"
#include "windows.hpp"
