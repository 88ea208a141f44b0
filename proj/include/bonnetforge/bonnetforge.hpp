#pragma once

#include "bonnetforge/quaternion.hpp"
#include "bonnetforge/grid.hpp"
#include "bonnetforge/calculus.hpp"
#include "bonnetforge/surface.hpp"
#include "bonnetforge/generators.hpp"
#include "bonnetforge/isothermic.hpp"
#include "bonnetforge/spin.hpp"
#include "bonnetforge/align.hpp"
#include "bonnetforge/bonnet.hpp"
#include "bonnetforge/errors.hpp"
#include "bonnetforge/mesh_io.hpp"
#include "bonnetforge/report.hpp"
#include "bonnetforge/config.hpp"
#include "bonnetforge/pipeline.hpp"
