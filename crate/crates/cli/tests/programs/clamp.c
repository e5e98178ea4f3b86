int main()
    //@ requires true;
    //@ ensures 0 <= result && result <= 10;
{
    int v = 0 - 25;
    int out = 0;
    if (v < 0) {
        out = 0;
    } else {
        if (10 < v) {
            out = 10;
        } else {
            out = v;
        }
    }
    return out;
}
