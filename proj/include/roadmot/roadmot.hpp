#pragma once

#include "roadmot/assoc/hungarian.hpp"
#include "roadmot/assoc/nms.hpp"
#include "roadmot/assoc/tracker.hpp"
#include "roadmot/costs/cost_matrix.hpp"
#include "roadmot/costs/pairwise.hpp"
#include "roadmot/detection.hpp"
#include "roadmot/errors.hpp"
#include "roadmot/eval/clearmot.hpp"
#include "roadmot/eval/report_io.hpp"
#include "roadmot/geometry/camera.hpp"
#include "roadmot/geometry/polygon.hpp"
#include "roadmot/geometry/region.hpp"
#include "roadmot/geometry/rigid_motion.hpp"
#include "roadmot/io/kitti.hpp"
#include "roadmot/sim/shape_model.hpp"
#include "roadmot/sim/simulator.hpp"
