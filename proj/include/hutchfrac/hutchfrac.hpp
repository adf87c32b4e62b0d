#pragma once

#include "hutchfrac/axioms.hpp"
#include "hutchfrac/classify.hpp"
#include "hutchfrac/commands.hpp"
#include "hutchfrac/config.hpp"
#include "hutchfrac/corpus.hpp"
#include "hutchfrac/errors.hpp"
#include "hutchfrac/hausdorff.hpp"
#include "hutchfrac/hutchinson.hpp"
#include "hutchfrac/lipschitz.hpp"
#include "hutchfrac/maps.hpp"
#include "hutchfrac/metric.hpp"
#include "hutchfrac/oscillation.hpp"
#include "hutchfrac/output.hpp"
#include "hutchfrac/parallel.hpp"
#include "hutchfrac/point.hpp"
#include "hutchfrac/remetrize.hpp"
#include "hutchfrac/report.hpp"
#include "hutchfrac/rng.hpp"
#include "hutchfrac/verify.hpp"
