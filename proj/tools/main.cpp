#include <cstdio>
int main() { std::puts("loopfock placeholder"); return 0; }
