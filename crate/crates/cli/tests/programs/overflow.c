int main()
    //@ requires true;
    //@ ensures true;
{
    int x = 2147483647 + 1;
    return x;
}
