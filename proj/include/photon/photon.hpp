#pragma once

#include "photon/core.hpp"
#include "photon/kgrid.hpp"
#include "photon/polarization.hpp"
#include "photon/wavefunction.hpp"
#include "photon/gradient.hpp"
#include "photon/scalarprod.hpp"
#include "photon/lorentz.hpp"
#include "photon/localization.hpp"
#include "photon/tail.hpp"

namespace photon {
inline constexpr const char* version = "0.1.0";
}
