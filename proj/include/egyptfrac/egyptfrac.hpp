#pragma once

#include "egyptfrac/absorption.hpp"
#include "egyptfrac/counting.hpp"
#include "egyptfrac/entropy.hpp"
#include "egyptfrac/errors.hpp"
#include "egyptfrac/exactmath.hpp"
#include "egyptfrac/modelsim.hpp"
#include "egyptfrac/modular.hpp"
#include "egyptfrac/random.hpp"
#include "egyptfrac/rational.hpp"
