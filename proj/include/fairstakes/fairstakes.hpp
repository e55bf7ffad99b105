// Umbrella header.
#pragma once

#include "fairstakes/classifier.hpp"
#include "fairstakes/distribution.hpp"
#include "fairstakes/equilibrium.hpp"
#include "fairstakes/errors.hpp"
#include "fairstakes/fairness.hpp"
#include "fairstakes/mechanism.hpp"
#include "fairstakes/montecarlo.hpp"
#include "fairstakes/report.hpp"
#include "fairstakes/scenario.hpp"
