#pragma once

// Umbrella header.

#include "gme/types.hpp"
#include "gme/core.hpp"
#include "gme/sym.hpp"
#include "gme/eig.hpp"
#include "gme/h1.hpp"
#include "gme/h2.hpp"
#include "gme/h3.hpp"
#include "gme/oracle.hpp"
#include "gme/oprange.hpp"
#include "gme/io.hpp"
