#include "klab/geometry.hpp"

#include <cstdio>

int main()
{
    std::puts("klab cli placeholder");
    return 0;
}
