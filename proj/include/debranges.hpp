#pragma once

#include "debranges/core.hpp"
#include "debranges/potential.hpp"
#include "debranges/schrodinger.hpp"
#include "debranges/zeros.hpp"
#include "debranges/spectra.hpp"
#include "debranges/products.hpp"
#include "debranges/paley_wiener.hpp"
#include "debranges/characterization.hpp"
#include "debranges/resonances.hpp"
#include "debranges/sources.hpp"
#include "debranges/io.hpp"
