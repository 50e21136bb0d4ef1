#pragma once

#include "minsurf/catalog.hpp"
#include "minsurf/certificates.hpp"
#include "minsurf/config.hpp"
#include "minsurf/eigensolver.hpp"
#include "minsurf/errors.hpp"
#include "minsurf/geometry.hpp"
#include "minsurf/mesh.hpp"
#include "minsurf/mesh_io.hpp"
#include "minsurf/moebius.hpp"
#include "minsurf/operators.hpp"
#include "minsurf/sampling.hpp"
#include "minsurf/second_variation.hpp"
#include "minsurf/verify.hpp"
