#pragma once

#include "lpm/error.hpp"
#include "lpm/core/space.hpp"
#include "lpm/core/measure.hpp"
#include "lpm/core/json_io.hpp"
#include "lpm/core/random.hpp"
#include "lpm/lpmetric/max_flow.hpp"
#include "lpm/lpmetric/distance.hpp"
#include "lpm/reconstruct/simplex.hpp"
#include "lpm/reconstruct/hull.hpp"
#include "lpm/reconstruct/oracle.hpp"
#include "lpm/reconstruct/profile.hpp"
#include "lpm/reconstruct/peel.hpp"
#include "lpm/isometry/affine.hpp"
