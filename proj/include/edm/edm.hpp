#pragma once

#include "edm/assoc.hpp"
#include "edm/correlate.hpp"
#include "edm/dbscan.hpp"
#include "edm/error.hpp"
#include "edm/id3.hpp"
#include "edm/id3_io.hpp"
#include "edm/model.hpp"
#include "edm/synth.hpp"
