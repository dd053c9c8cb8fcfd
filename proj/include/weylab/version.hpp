#pragma once

#define WEYLAB_VERSION "0.1.0"
