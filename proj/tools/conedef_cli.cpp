#include <cstdio>

int main()
{
    std::puts("conedef: placeholder");
    return 0;
}
