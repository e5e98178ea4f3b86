int main()
    //@ requires true;
    //@ ensures true;
{
    int x = (-2147483648) / -1;
    return x;
}
