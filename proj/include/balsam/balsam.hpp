#pragma once

// Convenience include for the whole library.

#include "balsam/assignment.hpp"
#include "balsam/clustering.hpp"
#include "balsam/common.hpp"
#include "balsam/disparity.hpp"
#include "balsam/estimators.hpp"
#include "balsam/gfs.hpp"
#include "balsam/gms.hpp"
#include "balsam/harness.hpp"
#include "balsam/indices.hpp"
#include "balsam/nms.hpp"
#include "balsam/population.hpp"
