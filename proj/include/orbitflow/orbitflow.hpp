#pragma once

#include "orbitflow/acceptance.hpp"
#include "orbitflow/algebra.hpp"
#include "orbitflow/catalog.hpp"
#include "orbitflow/commands.hpp"
#include "orbitflow/config.hpp"
#include "orbitflow/error.hpp"
#include "orbitflow/hamiltonian.hpp"
#include "orbitflow/linalg.hpp"
#include "orbitflow/metric.hpp"
#include "orbitflow/polynomial.hpp"
#include "orbitflow/rational.hpp"
#include "orbitflow/representation.hpp"
#include "orbitflow/runs.hpp"
#include "orbitflow/splitting.hpp"
