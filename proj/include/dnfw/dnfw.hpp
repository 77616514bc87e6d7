#pragma once

#include "dnfw/bits.hpp"
#include "dnfw/boolfn.hpp"
#include "dnfw/harness.hpp"
#include "dnfw/langgen.hpp"
#include "dnfw/machines.hpp"
#include "dnfw/martingale.hpp"
#include "dnfw/self_check.hpp"
#include "dnfw/width.hpp"
#include "dnfw/width_bettor.hpp"
