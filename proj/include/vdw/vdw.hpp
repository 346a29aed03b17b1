#pragma once

#include "vdw/errors.hpp"
#include "vdw/tensor.hpp"
#include "vdw/params.hpp"
#include "vdw/potentials.hpp"
#include "vdw/time_kernel.hpp"
#include "vdw/quadrature.hpp"
#include "vdw/oracle.hpp"
#include "vdw/units.hpp"
