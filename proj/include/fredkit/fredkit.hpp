#pragma once

#include "fredkit/config.hpp"
#include "fredkit/error.hpp"
#include "fredkit/fredholm.hpp"
#include "fredkit/io.hpp"
#include "fredkit/jordan.hpp"
#include "fredkit/kernel.hpp"
#include "fredkit/linalg.hpp"
#include "fredkit/measure.hpp"
#include "fredkit/nystrom.hpp"
#include "fredkit/operator_svd.hpp"
#include "fredkit/power.hpp"
#include "fredkit/spectral.hpp"
