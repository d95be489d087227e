#pragma once

#include "fairpoison/attacks.hpp"
#include "fairpoison/csv.hpp"
#include "fairpoison/dataspace.hpp"
#include "fairpoison/errors.hpp"
#include "fairpoison/experiment.hpp"
#include "fairpoison/fairmetrics.hpp"
#include "fairpoison/linmodel.hpp"
#include "fairpoison/rng.hpp"
#include "fairpoison/sanitizer.hpp"
#include "fairpoison/schema.hpp"
#include "fairpoison/types.hpp"
