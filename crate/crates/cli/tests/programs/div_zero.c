int main()
    //@ requires true;
    //@ ensures true;
{
    int x = 1 / 0;
    return x;
}
