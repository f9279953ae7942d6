#pragma once

#include "amms/rational.hpp"
#include "amms/core.hpp"
#include "amms/mms_oracle.hpp"
#include "amms/matching.hpp"
#include "amms/procedures.hpp"
#include "amms/verify.hpp"
#include "amms/solvers.hpp"
#include "amms/io.hpp"
#include "amms/harness.hpp"
