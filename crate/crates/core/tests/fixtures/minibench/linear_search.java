public class LinearSearch {
    /*@ requires a != null;
      @ ensures (\result == -1 && (\forall int i; 0 <= i && i < a.length; a[i] != key))
      @      || (0 <= \result && \result < a.length && a[\result] == key
      @          && (\forall int i; 0 <= i && i < \result; a[i] != key));
      @*/
    public int linearSearch(int[] a, int key) {
        for (int i = 0; i < a.length; i++) {
            if (a[i] == key) {
                return i;
            }
        }
        return -1;
    }
}
