// Umbrella header: pulls in the whole library.
//
//   exact arithmetic        markoff/numeric.hpp
//   p-adic machinery        markoff/padic.hpp
//   surfaces and symmetries markoff/surface.hpp
//   lattice cohomology      markoff/picard.hpp
//   local invariants        markoff/local_brauer.hpp
//   descent and reduction   markoff/descent.hpp
//   real components         markoff/real_locus.hpp
//   approximation witnesses markoff/strongapprox.hpp
//   level census            markoff/census.hpp
#pragma once

#include "markoff/census.hpp"
#include "markoff/descent.hpp"
#include "markoff/local_brauer.hpp"
#include "markoff/numeric.hpp"
#include "markoff/padic.hpp"
#include "markoff/picard.hpp"
#include "markoff/real_locus.hpp"
#include "markoff/strongapprox.hpp"
#include "markoff/surface.hpp"
