int halve(int n)
    //@ requires 0 <= n && n <= 1000;
    //@ ensures result <= n && 0 <= result;
{
    int h = n / 2;
    return h;
}
