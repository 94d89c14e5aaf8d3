#pragma once

#include "ock/channel.hpp"
#include "ock/config.hpp"
#include "ock/detection.hpp"
#include "ock/errors.hpp"
#include "ock/framing.hpp"
#include "ock/passband.hpp"
#include "ock/report.hpp"
#include "ock/rng.hpp"
#include "ock/rx_coherent.hpp"
#include "ock/rx_noncoherent.hpp"
#include "ock/sweep.hpp"
#include "ock/sync.hpp"
#include "ock/theory.hpp"
#include "ock/types.hpp"
#include "ock/wav.hpp"
#include "ock/waveform.hpp"
