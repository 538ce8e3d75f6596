#pragma once

#include "error.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"
#include "ref_element.hpp"
#include "fe_spaces.hpp"
#include "physics.hpp"
#include "dpg.hpp"
#include "spectral.hpp"
#include "harness.hpp"
