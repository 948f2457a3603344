#pragma once

#include "kraus_reclaim/matcore.hpp"
#include "kraus_reclaim/channel.hpp"
#include "kraus_reclaim/families.hpp"
#include "kraus_reclaim/dilation.hpp"
#include "kraus_reclaim/optimizer.hpp"
#include "kraus_reclaim/report.hpp"
#include "kraus_reclaim/verify.hpp"
