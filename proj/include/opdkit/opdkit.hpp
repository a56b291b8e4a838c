#pragma once

#include "opdkit/analysis.hpp"
#include "opdkit/dense_oracle.hpp"
#include "opdkit/enhance.hpp"
#include "opdkit/errors.hpp"
#include "opdkit/metrics.hpp"
#include "opdkit/opd.hpp"
#include "opdkit/projection.hpp"
#include "opdkit/wav_io.hpp"
#include "opdkit/waveform.hpp"
