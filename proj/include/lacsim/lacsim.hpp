#pragma once

#include "lacsim/errors.hpp"
#include "lacsim/units.hpp"
#include "lacsim/spin_algebra.hpp"
#include "lacsim/hamiltonian.hpp"
#include "lacsim/evolution.hpp"
#include "lacsim/oracle.hpp"
#include "lacsim/spectrum.hpp"
#include "lacsim/run_config.hpp"
#include "lacsim/presets.hpp"
#include "lacsim/config.hpp"
#include "lacsim/spectrum_io.hpp"
