int main()
    //@ requires true;
    //@ ensures true;
{
    int x = ;
    return x;
}
