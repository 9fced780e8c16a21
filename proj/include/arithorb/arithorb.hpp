#pragma once

#include "arithorb/exact_arith.hpp"
#include "arithorb/field_invariants.hpp"
#include "arithorb/growth_bound.hpp"
#include "arithorb/spinor.hpp"
