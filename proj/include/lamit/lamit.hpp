#pragma once

#include "lamit/util.hpp"
#include "lamit/feature_core.hpp"
#include "lamit/lexicon.hpp"
#include "lamit/corpus.hpp"
#include "lamit/annotation.hpp"
#include "lamit/wav.hpp"
#include "lamit/dsp.hpp"
#include "lamit/landmarks.hpp"
#include "lamit/lexical_access.hpp"
#include "lamit/config.hpp"
