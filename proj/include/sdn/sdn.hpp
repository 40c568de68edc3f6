#pragma once

#include "sdn/dp.hpp"
#include "sdn/grid.hpp"
#include "sdn/init.hpp"
#include "sdn/io.hpp"
#include "sdn/metrics.hpp"
#include "sdn/normals.hpp"
#include "sdn/pipeline.hpp"
#include "sdn/refine.hpp"
#include "sdn/scene.hpp"
