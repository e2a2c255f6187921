#pragma once

#include "stwave/adapt.hpp"
#include "stwave/assembly.hpp"
#include "stwave/errors.hpp"
#include "stwave/fespace.hpp"
#include "stwave/mesh.hpp"
#include "stwave/optcontrol.hpp"
#include "stwave/postproc.hpp"
#include "stwave/quadrature.hpp"
#include "stwave/solvers.hpp"
#include "stwave/sparse.hpp"
#include "stwave/targets.hpp"
#include "stwave/vtk.hpp"
